// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! `name,method,value` CSV rows on standard output.

use std::fmt::Display;

use tomoct::state::PSD_TOL;

pub struct Report {
    rows: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self {
            rows: vec!["name,method,value".to_string()],
        }
    }

    pub fn row(&mut self, name: &str, method: &str, value: impl Display) {
        self.rows.push(format!("{name},{method},{value}"));
    }

    pub fn number(&mut self, name: &str, method: &str, value: f64) {
        self.row(name, method, format!("{value:.6}"));
    }

    pub fn list(&mut self, name: &str, method: &str, values: &[f64]) {
        let joined: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
        self.row(name, method, joined.join(" "));
    }

    /// Eigenvalues, the smallest one, and a VALID/INVALID verdict.
    pub fn eigenvalues(&mut self, method: &str, values: &[f64]) {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        self.list("eigenvalues", method, values);
        self.row("min_eigenvalue", method, format!("{min:.6e}"));
        self.row("validity", method, if min >= -PSD_TOL { "VALID" } else { "INVALID" });
    }

    pub fn print(&self) {
        for r in &self.rows {
            println!("{r}");
        }
    }
}
