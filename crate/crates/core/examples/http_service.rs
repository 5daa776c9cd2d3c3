//! Start the HTTP service on an ephemeral port and exercise it the way
//! the web UI does: parse an edit, then stream chunks.

use bytebeat::gateway::{serve, AppState};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    tokio::spawn(serve(listener, AppState::default()));
    let client = reqwest::Client::new();

    for expr in ["3*t&t>>8", "t&&t"] {
        let reply = client
            .post(format!("{base}/expr/parse"))
            .header("content-type", "application/json")
            .body(serde_json::json!({ "expr": expr }).to_string())
            .send()
            .await?
            .text()
            .await?;
        println!("POST /expr/parse {expr:<10} -> {reply}");
    }

    // two consecutive chunks of the Forty-Two Melody
    for t0 in [0, 8192] {
        let url = format!("{base}/render?expr=t*(42%26t%3E%3E10)&t0={t0}&n=8192");
        let body = client.get(&url).send().await?.bytes().await?;
        println!("GET /render t0={t0:<5} -> {} bytes, first {:?}", body.len(), &body[..8]);
    }

    let pitch = client
        .get(format!("{base}/analyze/pitch?expr=t*8&n=2048&ref=c256"))
        .send()
        .await?
        .text()
        .await?;
    println!("GET /analyze/pitch t*8 -> {pitch}");
    Ok(())
}
