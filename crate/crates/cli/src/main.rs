fn main() {
    std::process::exit(osclab_cli::run());
}
