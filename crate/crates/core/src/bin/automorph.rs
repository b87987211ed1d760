use std::io::Write;

fn main() {
    let (code, mut out) = automorph::cli::run_args(std::env::args_os());
    if !out.ends_with('\n') {
        out.push('\n');
    }
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    std::process::exit(code);
}
