fn main() {
    std::process::exit(structforge_cli::run(std::env::args_os()));
}
