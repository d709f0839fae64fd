#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Stdio};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rdfsheet")
}

/// A `rdfsheet serve` child process on an ephemeral port.
pub struct Server {
    child: Child,
    pub base: String,
}

impl Server {
    pub fn start(data_dir: Option<&Path>, extra: &[&str]) -> Server {
        let mut cmd = Command::new(bin());
        cmd.args(["serve", "--addr", "127.0.0.1:0"]).args(extra);
        cmd.env_remove("RDFSHEET_DATA_DIR");
        if let Some(d) = data_dir {
            cmd.arg("--data-dir").arg(d);
        }
        let mut child = cmd
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("spawn server");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let base = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        Server { child, base }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    /// SIGKILL, no chance to flush anything.
    pub fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn create_workbook(client: &reqwest::blocking::Client, server: &Server) -> String {
    let resp = client.post(server.url("/workbooks")).send().unwrap();
    assert_eq!(resp.status().as_u16(), 201);
    let v: serde_json::Value = serde_json::from_slice(&resp.bytes().unwrap()).unwrap();
    v["id"].as_str().unwrap().to_string()
}

pub fn post_edit(
    client: &reqwest::blocking::Client,
    server: &Server,
    id: &str,
    edit: &impl serde::Serialize,
) -> serde_json::Value {
    let resp = client
        .post(server.url(&format!("/workbooks/{id}/edits")))
        .body(serde_json::to_string(edit).unwrap())
        .send()
        .unwrap();
    assert!(resp.status().is_success(), "edit failed: {}", resp.status());
    serde_json::from_slice(&resp.bytes().unwrap()).unwrap()
}

pub fn export(client: &reqwest::blocking::Client, server: &Server, id: &str) -> Vec<u8> {
    let resp = client
        .get(server.url(&format!("/workbooks/{id}/export")))
        .send()
        .unwrap();
    assert!(resp.status().is_success());
    resp.bytes().unwrap().to_vec()
}
