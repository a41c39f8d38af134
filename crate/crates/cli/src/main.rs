fn main() {
    std::process::exit(oss_cli::run(std::env::args_os()));
}
