use std::process::exit;

fn main() {
    exit(wsn_sis::cli::main_entry(std::env::args_os()));
}
