use clap::Parser;

use disclosure_games::cli::{run, Cli};

fn main() {
    if let Err(e) = run(Cli::parse()) {
        let cause: Vec<String> = e.chain().map(|c| c.to_string()).collect();
        eprintln!("error: {}", cause.join(": "));
        std::process::exit(1);
    }
}
