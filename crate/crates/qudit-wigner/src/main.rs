fn main() {
    std::process::exit(qudit_wigner::cli::run());
}
