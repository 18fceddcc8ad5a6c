fn main() {
    std::process::exit(raman_photostat::cli::run(std::env::args_os()));
}
