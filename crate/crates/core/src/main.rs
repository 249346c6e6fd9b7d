fn main() {
    std::process::exit(dbwt::cli::run());
}
