//! Serves the JSON API with built-in resources.
//!
//!     cargo run --example http_service
//!     curl -s localhost:8080/api/ask -H 'content-type: application/json' \
//!          -d '{"question":"ai là sinh viên của lớp khoa học máy tính?"}'

use std::sync::Arc;
use std::time::Duration;

use vnqa::service::{http, Service};
use vnqa::Engine;

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let svc = Arc::new(Service::new(Engine::builtin().unwrap(), Duration::from_secs(600), 1024));
    let addr = "127.0.0.1:8080".parse().unwrap();
    eprintln!("listening on http://{addr}");
    http::serve(svc, None, addr).await
}
