//! Fixtures shared by the CLI integration tests and the acceptance harness.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::io::Read;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use evalkit::equivariance::circular_box_blur;
use evalkit::ingest::save_png;
use evalkit::{Channels, Image};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_evalkit")
}

pub fn evalkit(args: &[&str]) -> Output {
    Command::new(bin()).args(args).env_remove("EVALKIT_OUT_DIR").output().expect("spawn evalkit")
}

pub fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// 8-bit uniform noise, exactly representable in a PNG.
pub fn quantized_noise(size: usize, rng: &mut ChaCha8Rng) -> Image {
    Image::from_fn(size, size, Channels::Gray, |_, _, _| rng.random_range(0..=255u8) as f64 / 255.0).unwrap()
}

/// Writes `n` noise images (box-blurred with `blur` when given) and a manifest.
pub fn noise_corpus(dir: &Path, name: &str, n: usize, size: usize, seed: u64, blur: Option<usize>, label: &str) -> PathBuf {
    let sub = dir.join(name);
    std::fs::create_dir_all(&sub).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("path,label\n");
    for i in 0..n {
        let img = quantized_noise(size, &mut rng);
        let img = match blur {
            Some(r) => circular_box_blur(&img, r),
            None => img,
        };
        let rel = format!("{name}/{i:04}.png");
        save_png(&img, &dir.join(&rel)).unwrap();
        csv.push_str(&format!("{rel},{label}\n"));
    }
    let manifest = dir.join(format!("{name}.csv"));
    std::fs::write(&manifest, csv).unwrap();
    manifest
}

/// Frequency response of a circular box of width `2r + 1` on `n` samples.
pub fn box_response(u: usize, n: usize, r: usize) -> f64 {
    if u == 0 {
        return 1.0;
    }
    let w = (2 * r + 1) as f64;
    (PI * u as f64 * w / n as f64).sin() / (w * (PI * u as f64 / n as f64).sin())
}

/// Parses an `index,<col>,...` slice file into columns.
pub fn read_slice(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let width = lines.next().unwrap().split(',').count();
    let mut cols = vec![Vec::new(); width - 1];
    for line in lines {
        for (c, cell) in line.split(',').skip(1).enumerate() {
            cols[c].push(cell.parse().unwrap());
        }
    }
    cols
}

pub fn write_series(path: &Path, values: &[f64]) {
    let mut csv = String::from("step,value\n");
    for (i, v) in values.iter().enumerate() {
        csv.push_str(&format!("{},{v}\n", (i + 1) * 1000));
    }
    std::fs::write(path, csv).unwrap();
}

/// 600 points falling from 40 to 25 with noise; the final value sits `drop`
/// below the mean of the preceding tail points.
pub fn decreasing_series(seed: u64, drop: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<f64> =
        (0..599).map(|i| 40.0 - 15.0 * i as f64 / 599.0 + 0.4 * rng.sample::<f64, _>(StandardNormal)).collect();
    let tail = &values[600 - 180..];
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    values.push(tail_mean - drop);
    values
}

/// A `turing serve` child process on a free local port.
pub struct Server {
    child: Child,
    pub base: String,
}

impl Server {
    pub fn start(log: &Path) -> Server {
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let addr = format!("127.0.0.1:{port}");
        let child = Command::new(bin())
            .args(["turing", "serve", "--addr", &addr, "--log"])
            .arg(log)
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .expect("spawn server");
        let mut server = Server { child, base: format!("http://{addr}") };
        let deadline = Instant::now() + Duration::from_secs(20);
        while std::net::TcpStream::connect(&addr).is_err() {
            if let Ok(Some(status)) = server.child.try_wait() {
                let mut err = String::new();
                server.child.stderr.take().unwrap().read_to_string(&mut err).unwrap();
                panic!("server exited with {status}: {err}");
            }
            assert!(Instant::now() < deadline, "server did not start");
            std::thread::sleep(Duration::from_millis(20));
        }
        server
    }

    /// Hard stop, as in a crash.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Synchronous wrapper over the async HTTP client.
pub struct Client {
    rt: tokio::runtime::Runtime,
    http: reqwest::Client,
    base: String,
}

impl Client {
    pub fn new(server: &Server) -> Client {
        let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
        Client { rt, http: reqwest::Client::new(), base: server.base.clone() }
    }

    fn send(&self, req: reqwest::RequestBuilder) -> (u16, Value) {
        self.rt.block_on(async {
            let r = req.send().await.unwrap();
            (r.status().as_u16(), r.json().await.unwrap_or(Value::Null))
        })
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        self.send(self.http.get(format!("{}{path}", self.base)))
    }

    pub fn post(&self, path: &str, body: Value) -> (u16, Value) {
        self.send(self.http.post(format!("{}{path}", self.base)).json(&body))
    }
}

/// Real and synthetic pools of 8x8 noise for grading sessions.
pub fn turing_pools(dir: &Path, per_pool: usize) -> (PathBuf, PathBuf) {
    (
        noise_corpus(dir, "pool_a", per_pool, 8, 1, None, "real"),
        noise_corpus(dir, "pool_b", per_pool, 8, 2, Some(1), "synthetic"),
    )
}

/// True labels of a session's items, in order, read back from the service log.
pub fn logged_truth(log: &Path, id: &str) -> Vec<evalkit_turing::TrueLabel> {
    let store = evalkit_turing::log::replay(log).unwrap();
    store.get(id).unwrap().items.iter().map(|i| i.label).collect()
}

/// Drives one session to completion; `correct(truth)` decides each answer.
pub fn grade(client: &Client, log: &Path, id: &str, mut correct: impl FnMut(evalkit_turing::TrueLabel) -> bool) {
    use evalkit_turing::TrueLabel;
    for (i, t) in logged_truth(log, id).into_iter().enumerate() {
        let (status, next) = client.get(&format!("/sessions/{id}/next"));
        assert_eq!((status, next["index"].as_u64()), (200, Some(i as u64)));
        let label = match (t, correct(t)) {
            (TrueLabel::Real, true) | (TrueLabel::Synthetic, false) => "real",
            _ => "fake",
        };
        let (status, ack) = client.post(&format!("/sessions/{id}/judgments"), serde_json::json!({"index": i, "label": label}));
        assert_eq!(status, 200, "{ack}");
    }
}
