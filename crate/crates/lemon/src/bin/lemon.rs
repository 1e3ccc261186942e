fn main() {
    std::process::exit(lemon_billiards::cli::run(std::env::args_os()));
}
