//! Binary entry point; all behavior lives in the library so tests can
//! drive exactly what the binary runs.

fn main() {
    restore_default_sigpipe();
    std::process::exit(testimate::run());
}

/// Piping output into `head` or a closing pager should end the process
/// the usual Unix way (terminated by SIGPIPE), not crash it with a
/// broken-pipe panic out of `println!`.
fn restore_default_sigpipe() {
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}
