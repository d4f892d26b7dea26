fn main() {
    std::process::exit(pulse_sir::cli::run());
}
