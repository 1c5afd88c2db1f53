fn main() {
    std::process::exit(fpt_height::cli::run(std::env::args_os()));
}
