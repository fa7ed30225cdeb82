use clap::Parser;
use rootstack_cli::{execute, Args, EXIT_OK, EXIT_USAGE};

fn main() {
    env_logger::init();
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(execute(&args));
}
