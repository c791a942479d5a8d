//! A minimal HTTP/1.1 policy stub on a std TcpListener.

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;
use std::time::Duration;

#[derive(Clone, Debug)]
pub enum Reply {
    /// Answer with the request's `debug_label`.
    Echo,
    /// Always answer this letter.
    Fixed(String),
    /// Sleep before answering "A".
    Slow(Duration),
    Status(u16),
    Raw(String),
}

/// Serve on an ephemeral port until the process exits; returns the URL.
pub fn spawn(reply: Reply) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let reply = reply.clone();
            thread::spawn(move || serve(stream, &reply));
        }
    });
    format!("http://{addr}/decide")
}

fn serve(stream: TcpStream, reply: &Reply) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut out = stream;
    loop {
        let mut len = 0usize;
        let mut line = String::new();
        // request line, then headers
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        loop {
            line.clear();
            if reader.read_line(&mut line).unwrap_or(0) == 0 {
                return;
            }
            let l = line.trim_end();
            if l.is_empty() {
                break;
            }
            if let Some((k, v)) = l.split_once(':') {
                if k.eq_ignore_ascii_case("content-length") {
                    len = v.trim().parse().unwrap_or(0);
                }
            }
        }
        let mut body = vec![0u8; len];
        if reader.read_exact(&mut body).is_err() {
            return;
        }
        let (status, text) = match reply {
            Reply::Echo => {
                let v: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
                let letter = v["debug_label"].as_str().unwrap_or("").to_string();
                (200, serde_json::json!({ "letter": letter }).to_string())
            }
            Reply::Fixed(l) => (200, serde_json::json!({ "letter": l }).to_string()),
            Reply::Slow(d) => {
                thread::sleep(*d);
                (200, r#"{"letter":"A"}"#.to_string())
            }
            Reply::Status(s) => (*s, "{}".to_string()),
            Reply::Raw(t) => (200, t.clone()),
        };
        let head = format!(
            "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n",
            text.len()
        );
        if out.write_all(head.as_bytes()).and_then(|_| out.write_all(text.as_bytes())).is_err() {
            return;
        }
    }
}
