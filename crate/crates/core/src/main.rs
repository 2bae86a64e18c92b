fn main() {
    std::process::exit(elladic::cli::run() as i32)
}
