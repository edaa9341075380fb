use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use recgame_cli::Failure;

fn main() -> ExitCode {
    // Exact arithmetic panics when a fraction outgrows i128; report that as a
    // limitation instead of a crash, and keep the default hook for real bugs.
    let default_hook = panic::take_hook();
    panic::set_hook(Box::new(move |info| {
        if !panic_message(info.payload()).starts_with("rational overflow") {
            default_hook(info);
        }
    }));

    let stdout = std::io::stdout();
    let result = panic::catch_unwind(AssertUnwindSafe(|| {
        recgame_cli::run(std::env::args_os(), &mut stdout.lock())
    }));
    let failure = match result {
        Ok(Ok(())) => return ExitCode::SUCCESS,
        Ok(Err(failure)) => failure,
        Err(payload) => {
            let message = panic_message(payload.as_ref());
            if !message.starts_with("rational overflow") {
                panic::resume_unwind(payload);
            }
            Failure::limitation("exact_overflow", message)
        }
    };
    eprintln!("{}", failure.to_json());
    ExitCode::from(failure.code)
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    payload
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}
