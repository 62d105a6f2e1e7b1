fn main() {
    std::process::exit(autodime::harness::run_cli(std::env::args()));
}
