//! Line transports for the environment service.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;

use super::EnvService;

/// Answers each request line on `input` with one line on `output` until EOF.
/// Blank lines are skipped.
pub fn serve_stream(service: &EnvService, input: impl BufRead, mut output: impl Write) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = service.handle_line(&line);
        output.write_all(reply.as_bytes())?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    Ok(())
}

pub fn serve_stdio(service: &EnvService) -> io::Result<()> {
    serve_stream(service, io::stdin().lock(), io::stdout().lock())
}

fn serve_connection(service: &EnvService, stream: TcpStream) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    serve_stream(service, reader, stream)
}

/// Serves every connection on its own thread; sessions are shared across
/// connections. Returns only if accepting fails.
pub fn serve_listener(service: Arc<EnvService>, listener: TcpListener) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let service = Arc::clone(&service);
        thread::spawn(move || {
            let _ = serve_connection(&service, stream);
        });
    }
    Ok(())
}

pub fn serve_tcp(service: Arc<EnvService>, addr: impl ToSocketAddrs) -> io::Result<()> {
    serve_listener(service, TcpListener::bind(addr)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvConfig;
    use serde_json::Value;

    #[test]
    fn one_reply_per_request_line() {
        let svc = EnvService::new(EnvConfig::default()).unwrap();
        let input = "{\"op\":\"reset\",\"session\":\"a\"}\n\n{\"op\":\"step\",\"session\":\"a\",\"answer\":\"\"}\nnonsense\n";
        let mut out = Vec::new();
        serve_stream(&svc, input.as_bytes(), &mut out).unwrap();
        let lines: Vec<Value> = String::from_utf8(out)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        let ops: Vec<&str> = lines.iter().map(|v| v["op"].as_str().unwrap()).collect();
        assert_eq!(ops, ["task", "result", "error"]);
    }

    #[test]
    fn tcp_sessions() {
        let svc = Arc::new(EnvService::new(EnvConfig::default()).unwrap());
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        thread::spawn(move || serve_listener(svc, listener));
        let clients: Vec<_> = (0..3)
            .map(|i| {
                thread::spawn(move || {
                    let mut conn = TcpStream::connect(addr).unwrap();
                    let mut reader = BufReader::new(conn.try_clone().unwrap());
                    let mut ops = Vec::new();
                    for req in [
                        format!("{{\"op\":\"reset\",\"session\":\"c{i}\"}}"),
                        format!("{{\"op\":\"step\",\"session\":\"c{i}\",\"answer\":\"x\"}}"),
                    ] {
                        writeln!(conn, "{req}").unwrap();
                        let mut line = String::new();
                        reader.read_line(&mut line).unwrap();
                        let v: Value = serde_json::from_str(&line).unwrap();
                        assert_eq!(v["session"], format!("c{i}"));
                        ops.push(v["op"].as_str().unwrap().to_string());
                    }
                    ops
                })
            })
            .collect();
        for c in clients {
            assert_eq!(c.join().unwrap(), ["task", "result"]);
        }
    }
}
