use std::process::ExitCode;

fn main() -> ExitCode {
    gasket::cli::main()
}
