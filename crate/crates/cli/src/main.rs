fn main() {
    std::process::exit(twoslit_cli::run(std::env::args_os()));
}
