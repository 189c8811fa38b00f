use propertime::cli;

/// Restore the default SIGPIPE disposition so that piping output into a
/// pager or `head` terminates the process quietly instead of panicking on
/// a failed write to a closed stdout.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    std::process::exit(cli::run());
}
