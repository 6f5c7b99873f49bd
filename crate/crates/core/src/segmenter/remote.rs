use std::sync::{Arc, Condvar, Mutex};
use std::thread;
use std::time::Duration;

use ureq::Agent;

use super::wire::{self, ErrorBody, HealthResponse, SegmentRequest, SegmentResponse};
use super::{validate_request, Segmenter, SegmenterError, SegmenterRequest, SegmenterResponse};

const MAX_BODY: u64 = 256 * 1024 * 1024;
const IMAGE_CACHE: usize = 8;

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://127.0.0.1:8000`.
    pub endpoint: String,
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: u32,
    /// Wait before the first retry; doubles on each further retry.
    pub backoff_base: Duration,
    pub max_in_flight: usize,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(60),
            retries: 3,
            backoff_base: Duration::from_millis(250),
            max_in_flight: 4,
        }
    }
}

/// HTTP client for a model server speaking the [`wire`] protocol.
///
/// Blocking; each call waits for its own response, so responses can never be
/// attributed to the wrong request. At most `max_in_flight` calls run at
/// once, the rest block.
pub struct RemoteSegmenter {
    config: RemoteConfig,
    agent: Agent,
    in_flight: (Mutex<usize>, Condvar),
    encoded: Mutex<Vec<(String, Arc<String>)>>,
}

enum Attempt {
    Retry(String),
    Fatal(SegmenterError),
}

impl RemoteSegmenter {
    pub fn new(mut config: RemoteConfig) -> Self {
        config.endpoint = config.endpoint.trim_end_matches('/').to_string();
        config.max_in_flight = config.max_in_flight.max(1);
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteSegmenter {
            config,
            agent,
            in_flight: (Mutex::new(0), Condvar::new()),
            encoded: Mutex::new(Vec::new()),
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// `GET /health`, retried like a segment call.
    pub fn health(&self) -> Result<HealthResponse, SegmenterError> {
        let url = format!("{}/health", self.config.endpoint);
        self.with_retries(|| {
            let mut resp = self
                .agent
                .get(&url)
                .call()
                .map_err(|e| Attempt::Retry(format!("GET {url}: {e}")))?;
            let status = resp.status().as_u16();
            let body = read_body(&mut resp).map_err(Attempt::Retry)?;
            classify(status, &body)?;
            serde_json::from_str(&body).map_err(|e| {
                Attempt::Fatal(SegmenterError::ProtocolError(format!("health body: {e}")))
            })
        })
    }

    fn with_retries<T>(
        &self,
        mut f: impl FnMut() -> Result<T, Attempt>,
    ) -> Result<T, SegmenterError> {
        let mut delay = self.config.backoff_base;
        let mut attempt = 0;
        loop {
            match f() {
                Ok(v) => return Ok(v),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => {
                    if attempt >= self.config.retries {
                        return Err(SegmenterError::BackendUnavailable(format!(
                            "{msg} (after {} attempts)",
                            attempt + 1
                        )));
                    }
                    log::warn!("{msg}; retrying in {delay:?}");
                    thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
            }
        }
    }

    fn encoded_image(&self, req: &SegmenterRequest<'_>) -> Result<Arc<String>, SegmenterError> {
        {
            let cache = self.encoded.lock().unwrap();
            if let Some((_, enc)) = cache.iter().find(|(id, _)| id == req.image_id) {
                return Ok(enc.clone());
            }
        }
        let png = wire::encode_image_png(req.image)
            .map_err(|e| SegmenterError::InvalidRequest(e.to_string()))?;
        let enc = Arc::new(wire::to_b64(&png));
        let mut cache = self.encoded.lock().unwrap();
        if cache.len() >= IMAGE_CACHE {
            cache.remove(0);
        }
        cache.push((req.image_id.to_string(), enc.clone()));
        Ok(enc)
    }

    fn acquire(&self) -> InFlight<'_> {
        let (lock, cv) = &self.in_flight;
        let mut n = lock.lock().unwrap();
        while *n >= self.config.max_in_flight {
            n = cv.wait(n).unwrap();
        }
        *n += 1;
        InFlight(&self.in_flight)
    }
}

struct InFlight<'a>(&'a (Mutex<usize>, Condvar));

impl Drop for InFlight<'_> {
    fn drop(&mut self) {
        let (lock, cv) = self.0;
        *lock.lock().unwrap() -= 1;
        cv.notify_one();
    }
}

fn read_body(resp: &mut ureq::http::Response<ureq::Body>) -> Result<String, String> {
    resp.body_mut()
        .with_config()
        .limit(MAX_BODY)
        .read_to_string()
        .map_err(|e| format!("reading body: {e}"))
}

/// 2xx passes, 5xx is retryable, anything else is a protocol error.
fn classify(status: u16, body: &str) -> Result<(), Attempt> {
    if (200..300).contains(&status) {
        return Ok(());
    }
    let detail = serde_json::from_str::<ErrorBody>(body)
        .map(|e| e.error)
        .unwrap_or_else(|_| body.chars().take(200).collect());
    if status >= 500 {
        Err(Attempt::Retry(format!("HTTP {status}: {detail}")))
    } else {
        Err(Attempt::Fatal(SegmenterError::ProtocolError(format!(
            "HTTP {status}: {detail}"
        ))))
    }
}

impl Segmenter for RemoteSegmenter {
    fn segment(&self, req: &SegmenterRequest<'_>) -> Result<SegmenterResponse, SegmenterError> {
        validate_request(req)?;
        let image = self.encoded_image(req)?;
        let body = serde_json::to_string(&SegmentRequest::from_prompt(
            req.image_id,
            image.to_string(),
            req.prompt,
        ))
        .map_err(|e| SegmenterError::InvalidRequest(e.to_string()))?;
        let url = format!("{}/segment", self.config.endpoint);
        let expected = (req.image.width(), req.image.height());

        let _slot = self.acquire();
        self.with_retries(|| {
            let mut resp = self
                .agent
                .post(&url)
                .header("content-type", "application/json")
                .send(body.as_bytes())
                .map_err(|e| Attempt::Retry(format!("POST {url}: {e}")))?;
            let status = resp.status().as_u16();
            let text = read_body(&mut resp).map_err(Attempt::Retry)?;
            classify(status, &text)?;
            let parsed: SegmentResponse = serde_json::from_str(&text).map_err(|e| {
                Attempt::Fatal(SegmenterError::ProtocolError(format!("response body: {e}")))
            })?;
            let mask = wire::decode_response_mask(&parsed, expected)
                .map_err(|e| Attempt::Fatal(SegmenterError::ProtocolError(e.to_string())))?;
            if !parsed.score.is_finite() {
                return Err(Attempt::Fatal(SegmenterError::ProtocolError(
                    "non-finite score".into(),
                )));
            }
            Ok(SegmenterResponse {
                mask,
                score: parsed.score,
            })
        })
    }

    fn name(&self) -> &str {
        "remote"
    }
}
