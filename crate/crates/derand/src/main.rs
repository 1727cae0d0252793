fn main() {
    // Placeholder until the CLI module lands.
    eprintln!("derand: CLI not wired up yet");
    std::process::exit(1);
}
