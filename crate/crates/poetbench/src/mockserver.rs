//! In-process mock HTTP server for tests and examples.
//!
//! Serves the two wire protocols the toolkit speaks:
//!
//! - `POST /complete` — completion: `{"prompt","max_tokens","temperature"}`
//!   → `{"text"}`
//! - `POST /score` — grammaticality: `{"lines":[..]}` → `{"scores":[..]}`
//!
//! Behavior is configured per instance: echo or canned completions, a
//! deterministic failure pattern (every Nth request 500s), and an optional
//! per-request delay. The server records every request body and tracks the
//! high-water mark of concurrent requests, so tests can assert what
//! actually went over the wire.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::{json, Value};

/// What `/complete` answers.
#[derive(Debug, Clone)]
pub enum CompletionBehavior {
    /// Respond with the request prompt followed by `suffix` (an endpoint
    /// that echoes the prompt).
    Echo { suffix: String },
    /// Respond with canned texts, cycled per request, prompt not echoed.
    Canned(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct MockConfig {
    pub completion: CompletionBehavior,
    /// Score `/score` returns for every line.
    pub scorer_score: f64,
    /// When `Some(n)`, every nth request per route fails with a 500
    /// (1-based count: `Some(2)` fails the 2nd, 4th, … requests;
    /// `Some(1)` fails every request).
    pub fail_every: Option<u64>,
    /// Sleep before answering each request.
    pub delay: Option<Duration>,
}

impl Default for MockConfig {
    fn default() -> Self {
        MockConfig {
            completion: CompletionBehavior::Echo { suffix: "and so am I.".to_string() },
            scorer_score: 0.8,
            fail_every: None,
            delay: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordedRequest {
    pub path: String,
    pub body: Value,
}

struct Shared {
    config: MockConfig,
    requests: Mutex<Vec<RecordedRequest>>,
    completion_count: AtomicU64,
    scorer_count: AtomicU64,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    stop: AtomicBool,
}

/// A running mock server; shuts down on drop.
pub struct MockServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    accept_thread: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn start(config: MockConfig) -> std::io::Result<MockServer> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            config,
            requests: Mutex::new(Vec::new()),
            completion_count: AtomicU64::new(0),
            scorer_count: AtomicU64::new(0),
            in_flight: AtomicUsize::new(0),
            max_in_flight: AtomicUsize::new(0),
            stop: AtomicBool::new(false),
        });
        let accept_shared = Arc::clone(&shared);
        let accept_thread = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if accept_shared.stop.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let conn_shared = Arc::clone(&accept_shared);
                std::thread::spawn(move || {
                    let _ = handle_connection(stream, &conn_shared);
                });
            }
        });
        Ok(MockServer { addr, shared, accept_thread: Some(accept_thread) })
    }

    pub fn completion_url(&self) -> String {
        format!("http://{}/complete", self.addr)
    }

    pub fn scorer_url(&self) -> String {
        format!("http://{}/score", self.addr)
    }

    /// Every request body received so far, in arrival order.
    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.shared.requests.lock().expect("mock lock").clone()
    }

    /// Highest number of simultaneously in-flight requests observed.
    pub fn max_in_flight(&self) -> usize {
        self.shared.max_in_flight.load(Ordering::SeqCst)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        // wake the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.accept_thread.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(stream: TcpStream, shared: &Shared) -> std::io::Result<()> {
    let in_flight = shared.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    shared.max_in_flight.fetch_max(in_flight, Ordering::SeqCst);
    let result = serve_one(stream, shared);
    shared.in_flight.fetch_sub(1, Ordering::SeqCst);
    result
}

fn serve_one(stream: TcpStream, shared: &Shared) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let mut parts = request_line.split_whitespace();
    let method = parts.next().unwrap_or("").to_string();
    let path = parts.next().unwrap_or("").to_string();

    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;

    if let Some(delay) = shared.config.delay {
        std::thread::sleep(delay);
    }

    let mut stream = reader.into_inner();
    if method != "POST" {
        return write_response(&mut stream, 405, &json!({"error": "POST only"}));
    }
    let Ok(body_json) = serde_json::from_slice::<Value>(&body) else {
        return write_response(&mut stream, 400, &json!({"error": "invalid json"}));
    };
    shared
        .requests
        .lock()
        .expect("mock lock")
        .push(RecordedRequest { path: path.clone(), body: body_json.clone() });

    let (counter, response) = match path.as_str() {
        "/complete" => (&shared.completion_count, complete(&body_json, shared)),
        "/score" => (&shared.scorer_count, score(&body_json, shared)),
        _ => return write_response(&mut stream, 404, &json!({"error": "unknown path"})),
    };

    let seq = counter.fetch_add(1, Ordering::SeqCst) + 1;
    if let Some(n) = shared.config.fail_every {
        if n > 0 && seq % n == 0 {
            return write_response(&mut stream, 500, &json!({"error": "mock failure"}));
        }
    }
    match response {
        Ok(value) => write_response(&mut stream, 200, &value),
        Err(message) => write_response(&mut stream, 400, &json!({"error": message})),
    }
}

fn complete(body: &Value, shared: &Shared) -> Result<Value, String> {
    let prompt = body
        .get("prompt")
        .and_then(Value::as_str)
        .ok_or("missing prompt")?;
    let text = match &shared.config.completion {
        CompletionBehavior::Echo { suffix } => format!("{prompt}{suffix}"),
        CompletionBehavior::Canned(texts) => {
            let idx = shared.completion_count.load(Ordering::SeqCst) as usize % texts.len();
            texts[idx].clone()
        }
    };
    Ok(json!({ "text": text }))
}

fn score(body: &Value, shared: &Shared) -> Result<Value, String> {
    let lines = body
        .get("lines")
        .and_then(Value::as_array)
        .ok_or("missing lines")?;
    let scores: Vec<f64> = vec![shared.config.scorer_score; lines.len()];
    Ok(json!({ "scores": scores }))
}

fn write_response(stream: &mut TcpStream, status: u16, body: &Value) -> std::io::Result<()> {
    let reason = match status {
        200 => "OK",
        400 => "Bad Request",
        404 => "Not Found",
        405 => "Method Not Allowed",
        _ => "Internal Server Error",
    };
    let payload = serde_json::to_string(body).expect("mock response serializes");
    let response = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    );
    stream.write_all(response.as_bytes())?;
    stream.flush()
}
