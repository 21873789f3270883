fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(fracscale::cli::run() as u8)
}
