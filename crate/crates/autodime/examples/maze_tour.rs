//! Generate doorless mazes, render them, and classify spawn difficulty.
//!
//! ```bash
//! cargo run --release --example maze_tour -- [seed]
//! ```

use autodime::env::{
    classify_difficulty, generate_layout, instance_to_line, render_ascii, reset, uniform_spawn,
    EnvParams,
};
use autodime::seed::{child_rng, Stream};

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);

    let layout = generate_layout(seed, 12, 12, 6).expect("desk-scale layout");
    println!(
        "maze seed {seed}: {}x{}, {} rooms, {} interior wall edges",
        layout.height(),
        layout.width(),
        layout.room_count(),
        layout.wall_edges().len()
    );

    let mut rng = child_rng(seed, Stream::Spawn, 0);
    for attempt in 0..3 {
        let spawn = uniform_spawn(&mut rng, &layout).expect("spawn");
        let difficulty = classify_difficulty(&layout, &spawn);
        println!("\nspawn {attempt}: {}", difficulty.label());
        println!("serialized: {}", instance_to_line(&layout, &spawn));
        let state = reset(&spawn, &EnvParams::default(), &mut rng);
        print!("{}", render_ascii(&layout, &state));
    }
}
