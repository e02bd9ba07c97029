use std::process::ExitCode;

fn main() -> ExitCode {
    // Deep demand chains unwind through one stack frame per lazy cell, so
    // give the work a generous stack instead of relying on the platform
    // default.
    let handle = std::thread::Builder::new()
        .name("knot".into())
        .stack_size(256 * 1024 * 1024)
        .spawn(|| {
            let argv: Vec<String> = std::env::args().collect();
            let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
            knot_cli::run(&refs, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
        })
        .expect("spawn worker");
    let code = handle.join().expect("worker panicked");
    ExitCode::from(code as u8)
}
