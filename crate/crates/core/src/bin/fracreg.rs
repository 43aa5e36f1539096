fn main() {
    std::process::exit(fracreg::cli::run(std::env::args_os()));
}
