use clap::Parser;

use ultrafix::cli::{execute, Cli};

fn main() {
    // Restore the default SIGPIPE disposition so output piped into `head`
    // or a pager ends the process quietly instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(execute(Cli::parse()));
}
