fn main() {
    std::process::exit(spectral_sl::cli::run(std::env::args_os()));
}
