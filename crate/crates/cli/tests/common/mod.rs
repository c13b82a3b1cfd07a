#![allow(dead_code)]

use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn darwinlab(args: &[&str]) -> Run {
    darwinlab_env(args, &[])
}

pub fn darwinlab_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_darwinlab"));
    cmd.args(args).env_remove("DARWINLAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf8"),
        stderr: String::from_utf8(out.stderr).expect("utf8"),
    }
}

/// Header, body rows and `#key=value` summaries.
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
}

impl Csv {
    pub fn parse(text: &str) -> Csv {
        let mut lines = text.split('\n').filter(|l| !l.is_empty());
        let header = lines.next().expect("header").split(',').map(String::from).collect();
        let mut rows = Vec::new();
        let mut summary = Vec::new();
        for l in lines {
            if let Some(s) = l.strip_prefix('#') {
                let (k, v) = s.split_once('=').expect("key=value");
                summary.push((k.to_string(), v.to_string()));
            } else {
                rows.push(l.split(',').map(String::from).collect());
            }
        }
        Csv { header, rows, summary }
    }

    pub fn col(&self, name: &str) -> Vec<String> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].clone()).collect()
    }

    pub fn num_col(&self, name: &str) -> Vec<f64> {
        self.col(name).iter().map(|v| v.parse().expect("number")).collect()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}
