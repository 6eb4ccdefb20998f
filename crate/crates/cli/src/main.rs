fn main() {
    std::process::exit(circfn_cli::run(std::env::args_os()));
}
