//! Live HTTP providers: a chat-completion style extractor and an
//! embedding endpoint client, with shared rate limiting and bounded
//! retry on transport failures.

use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::Triplet;
use crate::providers::{ExtractionRequest, LabelEmbedder, TripletExtractor};

/// Versioned prompt asset for triplet extraction.
const EXTRACTION_PROMPT_V1: &str = include_str!("extraction_prompt_v1.txt");

const MAX_ATTEMPTS: u32 = 3;
const BACKOFF_BASE: Duration = Duration::from_millis(250);

/// Serializes request bursts to a configured requests-per-second budget.
/// Shared across all workers of a run.
#[derive(Debug)]
pub struct RateLimiter {
    min_interval: Duration,
    last: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(requests_per_second: f64) -> Self {
        let rps = requests_per_second.max(0.001);
        RateLimiter {
            min_interval: Duration::from_secs_f64(1.0 / rps),
            last: Mutex::new(None),
        }
    }

    /// Block until a request slot is available.
    pub fn acquire(&self) {
        let mut last = self.last.lock().unwrap();
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < self.min_interval {
                std::thread::sleep(self.min_interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }
}

/// Retry transport-level failures with exponential backoff; 4xx responses
/// fail fast since retrying them cannot help.
fn with_retry<T>(what: &str, mut call: impl FnMut() -> std::result::Result<T, String>) -> Result<T> {
    let mut last_err = String::new();
    for attempt in 1..=MAX_ATTEMPTS {
        match call() {
            Ok(v) => return Ok(v),
            Err(msg) => {
                if msg.starts_with("fatal:") {
                    return Err(Error::Provider {
                        message: format!("{what}: {}", msg.trim_start_matches("fatal:").trim()),
                        attempts: attempt,
                    });
                }
                log::warn!("{what} attempt {attempt}/{MAX_ATTEMPTS} failed: {msg}");
                last_err = msg;
                if attempt < MAX_ATTEMPTS {
                    std::thread::sleep(BACKOFF_BASE * 2u32.pow(attempt - 1));
                }
            }
        }
    }
    Err(Error::Provider {
        message: format!("{what}: {last_err}"),
        attempts: MAX_ATTEMPTS,
    })
}

fn classify_status(status: reqwest::StatusCode, body: &str) -> String {
    if status.is_client_error() && status != reqwest::StatusCode::TOO_MANY_REQUESTS {
        format!("fatal: HTTP {status}: {body}")
    } else {
        format!("HTTP {status}: {body}")
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

/// Extractor backed by a chat-completion endpoint. Malformed responses
/// get one repair round trip before being rejected with the raw output.
pub struct HttpExtractor {
    client: reqwest::blocking::Client,
    url: String,
    api_key: String,
    limiter: Arc<RateLimiter>,
}

impl HttpExtractor {
    pub fn new(api_base: &str, api_key: &str, limiter: Arc<RateLimiter>) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| Error::Config(format!("cannot build HTTP client: {e}")))?;
        Ok(HttpExtractor {
            client,
            url: format!("{}/chat/completions", api_base.trim_end_matches('/')),
            api_key: api_key.to_string(),
            limiter,
        })
    }

    fn complete(&self, model: &str, user_content: &str) -> Result<String> {
        let body = json!({
            "model": model,
            "temperature": 0,
            "messages": [{"role": "user", "content": user_content}],
        });
        with_retry("chat completion", || {
            self.limiter.acquire();
            let resp = self
                .client
                .post(&self.url)
                .bearer_auth(&self.api_key)
                .json(&body)
                .send()
                .map_err(|e| e.to_string())?;
            let status = resp.status();
            if !status.is_success() {
                let text = resp.text().unwrap_or_default();
                return Err(classify_status(status, &text));
            }
            let parsed: ChatResponse = resp.json().map_err(|e| e.to_string())?;
            parsed
                .choices
                .first()
                .map(|c| c.message.content.clone())
                .ok_or_else(|| "response carried no choices".to_string())
        })
    }
}

/// Parse strict `head|relation|tail` lines. Code fences are tolerated and
/// stripped; anything else malformed is an error.
fn parse_triplet_lines(raw: &str, max_triplets: usize) -> std::result::Result<Vec<Triplet>, String> {
    let mut out = Vec::new();
    for line in raw.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("```") {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(format!("line '{line}' does not match head|relation|tail"));
        }
        let triplet = Triplet::new(fields[0], fields[1], fields[2]).map_err(|e| e.to_string())?;
        out.push(triplet);
        if out.len() == max_triplets {
            break;
        }
    }
    Ok(out)
}

impl TripletExtractor for HttpExtractor {
    fn extract(&self, req: &ExtractionRequest) -> Result<Vec<Triplet>> {
        let prompt = EXTRACTION_PROMPT_V1
            .replace("{max_triplets}", &req.max_triplets.to_string())
            .replace("{text}", &req.text);
        let first = self.complete(&req.model_id, &prompt)?;
        match parse_triplet_lines(&first, req.max_triplets) {
            Ok(triplets) => Ok(triplets),
            Err(first_problem) => {
                log::warn!("extraction output invalid ({first_problem}); requesting one repair");
                let repair = format!(
                    "{prompt}\n\nYour previous output was invalid: {first_problem}\n\
                     Previous output:\n{first}\n\nRe-emit ONLY valid head|relation|tail lines."
                );
                let second = self.complete(&req.model_id, &repair)?;
                parse_triplet_lines(&second, req.max_triplets).map_err(|message| {
                    Error::ExtractionFormat {
                        message,
                        raw: second,
                    }
                })
            }
        }
    }
}

#[derive(Deserialize)]
struct EmbedResponse {
    data: Vec<EmbedDatum>,
}

#[derive(Deserialize)]
struct EmbedDatum {
    embedding: Vec<f64>,
}

/// Embedding endpoint client; one POST per batch of distinct labels.
pub struct HttpEmbedder {
    client: reqwest::blocking::Client,
    url: String,
    api_key: String,
    model_id: String,
    limiter: Arc<RateLimiter>,
}

impl HttpEmbedder {
    pub fn new(url: &str, api_key: &str, model_id: &str, limiter: Arc<RateLimiter>) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| Error::Config(format!("cannot build HTTP client: {e}")))?;
        Ok(HttpEmbedder {
            client,
            url: url.to_string(),
            api_key: api_key.to_string(),
            model_id: model_id.to_string(),
            limiter,
        })
    }
}

impl LabelEmbedder for HttpEmbedder {
    fn embed(&self, labels: &[String]) -> Result<Vec<Vec<f64>>> {
        let body = json!({"model": self.model_id, "input": labels});
        let data = with_retry("embedding", || {
            self.limiter.acquire();
            let resp = self
                .client
                .post(&self.url)
                .bearer_auth(&self.api_key)
                .json(&body)
                .send()
                .map_err(|e| e.to_string())?;
            let status = resp.status();
            if !status.is_success() {
                let text = resp.text().unwrap_or_default();
                return Err(classify_status(status, &text));
            }
            let parsed: EmbedResponse = resp.json().map_err(|e| e.to_string())?;
            Ok(parsed.data)
        })?;
        if data.len() != labels.len() {
            return Err(Error::ProviderContract(format!(
                "embedding endpoint returned {} vectors for {} labels",
                data.len(),
                labels.len()
            )));
        }
        Ok(data.into_iter().map(|d| d.embedding).collect())
    }

    fn model_id(&self) -> &str {
        &self.model_id
    }
}
