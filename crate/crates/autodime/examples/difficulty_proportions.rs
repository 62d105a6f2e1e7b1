//! Monte-Carlo estimate of uniform-spawn difficulty proportions.
//!
//! At the desk scale (12x12, 6 rooms) most spawns are still impossible, but
//! far fewer than at the paper scale (30x30, 20 rooms), where roughly 7% of
//! environments are easy, 7% hard, and 86% impossible.
//!
//! ```bash
//! cargo run --release --example difficulty_proportions -- [samples]
//! ```

use autodime::env::{classify_difficulty, generate_layout, uniform_spawn, Difficulty};
use autodime::seed::{child_rng, Stream};

fn measure(label: &str, h: usize, w: usize, rooms: usize, n: u64) {
    let mut spawn_rng = child_rng(1234, Stream::Spawn, 0);
    let (mut easy, mut hard, mut impossible) = (0u64, 0u64, 0u64);
    for seed in 0..n {
        let layout = generate_layout(seed, h, w, rooms).expect("layout");
        let spawn = uniform_spawn(&mut spawn_rng, &layout).expect("spawn");
        match classify_difficulty(&layout, &spawn) {
            Difficulty::Easy => easy += 1,
            Difficulty::Hard => hard += 1,
            Difficulty::Impossible => impossible += 1,
        }
    }
    let pct = |c: u64| 100.0 * c as f64 / n as f64;
    println!(
        "{label} ({h}x{w}, {rooms} rooms, n={n}): easy {:.2}%  hard {:.2}%  impossible {:.2}%",
        pct(easy),
        pct(hard),
        pct(impossible)
    );
}

fn main() {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    measure("desk scale ", 12, 12, 6, n);
    measure("paper scale", 30, 30, 20, n);
}
