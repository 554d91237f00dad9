fn main() {
    std::process::exit(msc3::cli::run(std::env::args_os()));
}
