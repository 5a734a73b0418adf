use std::panic;

fn main() {
    let code = panic::catch_unwind(|| npcpt_cli::run(std::env::args_os())).unwrap_or(3);
    std::process::exit(code);
}
