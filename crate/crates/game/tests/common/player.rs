//! Scripted players for simulated games.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Vocabulary `t0..t{size}` with Zipf-like weights, so definitions reuse a
/// small set of common words the way real players do.
pub struct Player {
    vocab: Vec<String>,
    cumulative: Vec<f64>,
    pub rng: ChaCha8Rng,
}

impl Player {
    pub fn new(vocab_size: usize, rng: ChaCha8Rng) -> Self {
        let vocab: Vec<String> = (0..vocab_size).map(|i| format!("t{i}")).collect();
        let weights: Vec<f64> = (0..vocab_size).map(|r| 1.0 / (r as f64 + 1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Player { vocab, cumulative, rng }
    }

    pub fn word(&mut self) -> String {
        let x: f64 = self.rng.gen();
        let i = self.cumulative.partition_point(|&c| c < x).min(self.vocab.len() - 1);
        self.vocab[i].clone()
    }

    /// One to six tokens, occasionally padded with function words and
    /// odd capitalization that the server must clean up.
    pub fn definition(&mut self) -> Vec<String> {
        let len = self.rng.gen_range(1..=6);
        let mut out: Vec<String> = (0..len).map(|_| self.word()).collect();
        if self.rng.gen_bool(0.2) {
            out.insert(0, "The".to_string());
        }
        if self.rng.gen_bool(0.1) {
            let last = out.pop().unwrap();
            out.push(format!("{},", last.to_uppercase()));
        }
        out
    }
}
