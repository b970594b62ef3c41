//! Scene descriptions for base images.
//!
//! Sources are tried in order: a sidecar text file next to the image, then an
//! HTTP captioning service. The service receives `POST {"image_b64": ...}`
//! with the base64-encoded image file and must answer `{"caption": ...}`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::config::CaptionerConfig;
use crate::error::{Error, Result};

pub trait CaptionSource: Send + Sync {
    fn caption(&self, image: &Path) -> Result<String>;
}

fn caption_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Caption {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Reads `<stem>.txt`, falling back to `<file name>.txt`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SidecarCaptions;

impl SidecarCaptions {
    pub fn candidates(image: &Path) -> Vec<PathBuf> {
        let mut out = vec![image.with_extension("txt")];
        if let Some(name) = image.file_name() {
            let mut full = name.to_os_string();
            full.push(".txt");
            out.push(image.with_file_name(full));
        }
        out
    }
}

impl CaptionSource for SidecarCaptions {
    fn caption(&self, image: &Path) -> Result<String> {
        let Some(path) = Self::candidates(image).into_iter().find(|p| p.is_file()) else {
            return Err(caption_error(image, "no caption sidecar"));
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let text = text.trim();
        if text.is_empty() {
            return Err(caption_error(image, format!("{} is empty", path.display())));
        }
        Ok(text.to_string())
    }
}

#[derive(Serialize)]
struct CaptionRequest<'a> {
    image_b64: &'a str,
}

#[derive(Deserialize)]
struct CaptionResponse {
    caption: String,
}

#[derive(Debug, Clone)]
pub struct HttpCaptioner {
    endpoint: String,
    agent: ureq::Agent,
}

impl HttpCaptioner {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        Self {
            endpoint: endpoint.into(),
            agent,
        }
    }
}

impl CaptionSource for HttpCaptioner {
    fn caption(&self, image: &Path) -> Result<String> {
        let bytes = std::fs::read(image).map_err(|e| Error::io(image, e))?;
        let encoded = base64::engine::general_purpose::STANDARD.encode(bytes);
        let response: CaptionResponse = self
            .agent
            .post(&self.endpoint)
            .send_json(CaptionRequest { image_b64: &encoded })
            .and_then(|mut r| r.body_mut().read_json())
            .map_err(|e| caption_error(image, format!("{}: {e}", self.endpoint)))?;
        let caption = response.caption.trim();
        if caption.is_empty() {
            return Err(caption_error(image, "service returned an empty caption"));
        }
        Ok(caption.to_string())
    }
}

/// First source that succeeds wins.
pub struct CaptionChain {
    sources: Vec<Box<dyn CaptionSource>>,
}

impl CaptionChain {
    pub fn new(sources: Vec<Box<dyn CaptionSource>>) -> Self {
        Self { sources }
    }

    /// Sidecar files, then the configured endpoint if any.
    pub fn from_config(config: &CaptionerConfig) -> Self {
        let mut sources: Vec<Box<dyn CaptionSource>> = vec![Box::new(SidecarCaptions)];
        if let Some(endpoint) = &config.endpoint {
            sources.push(Box::new(HttpCaptioner::new(
                endpoint.clone(),
                Duration::from_secs(config.timeout_secs),
            )));
        }
        Self { sources }
    }
}

impl CaptionSource for CaptionChain {
    fn caption(&self, image: &Path) -> Result<String> {
        let mut messages = Vec::new();
        for s in &self.sources {
            match s.caption(image) {
                Ok(c) => return Ok(c),
                Err(Error::Caption { message, .. }) => messages.push(message),
                Err(e) => return Err(e),
            }
        }
        if messages.is_empty() {
            messages.push("no caption source configured".into());
        }
        Err(caption_error(image, messages.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    #[test]
    fn sidecar_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("squirrel.png");
        std::fs::write(&img, b"png").unwrap();
        assert!(SidecarCaptions.caption(&img).is_err());
        std::fs::write(dir.path().join("squirrel.png.txt"), "second choice").unwrap();
        assert_eq!(SidecarCaptions.caption(&img).unwrap(), "second choice");
        std::fs::write(dir.path().join("squirrel.txt"), "A squirrel eating a leaf\n").unwrap();
        assert_eq!(SidecarCaptions.caption(&img).unwrap(), "A squirrel eating a leaf");
        std::fs::write(dir.path().join("squirrel.txt"), "  \n").unwrap();
        assert!(SidecarCaptions.caption(&img).is_err());
    }

    #[test]
    fn chain_without_sources_fails() {
        let chain = CaptionChain::from_config(&CaptionerConfig::default());
        let err = chain.caption(Path::new("/nonexistent/x.png")).unwrap_err();
        assert!(matches!(err, Error::Caption { .. }));
    }

    /// One-shot HTTP server that checks the request body and answers with `reply`.
    fn serve_once(reply: &'static str) -> (String, std::thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
            }
            let mut body = vec![0u8; len];
            reader.read_exact(&mut body).unwrap();
            let mut stream = reader.into_inner();
            write!(
                stream,
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                reply.len(),
                reply
            )
            .unwrap();
            String::from_utf8(body).unwrap()
        });
        (format!("http://{addr}/caption"), handle)
    }

    #[test]
    fn http_captioner_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("a.png");
        std::fs::write(&img, b"\x89PNG").unwrap();
        let (url, handle) = serve_once(r#"{"caption": "A red bicycle"}"#);
        let cap = HttpCaptioner::new(url, Duration::from_secs(10)).caption(&img).unwrap();
        assert_eq!(cap, "A red bicycle");
        let body: serde_json::Value = serde_json::from_str(&handle.join().unwrap()).unwrap();
        assert_eq!(body["image_b64"], "iVBORw==");
    }

    #[test]
    fn http_captioner_rejects_bad_reply() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("a.png");
        std::fs::write(&img, b"x").unwrap();
        let (url, handle) = serve_once(r#"{"text": "nope"}"#);
        assert!(HttpCaptioner::new(url, Duration::from_secs(10)).caption(&img).is_err());
        handle.join().unwrap();
    }
}
