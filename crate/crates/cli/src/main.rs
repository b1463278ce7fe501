fn main() {
    std::process::exit(biharm_cli::run(std::env::args_os()));
}
