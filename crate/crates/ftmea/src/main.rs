fn main() -> std::process::ExitCode {
    ftmea::cli::main_with(std::env::args_os())
}
