//! Load parameters from TOML, apply command-line style overrides and show
//! the normalized values the solvers see.

use becfano::config::from_toml;
use becfano::model::normalize;

const TOML: &str = r#"
[cavity]
kappa_wb = 0.2
detuning_wb = 0.8

[condensate]
g_wb = 0.02
"#;

fn main() -> becfano::Result<()> {
    let overrides = [
        "condensate.u_eff_wb=5".to_owned(),
        "mode.stability=annotate".to_owned(),
    ];
    let s = from_toml(TOML, &overrides)?;
    let (p, warnings) = normalize(&s.params)?;
    println!("{p:#?}");
    println!("stability policy: {:?}", s.stability);
    for w in warnings {
        println!("warning: {w}");
    }
    Ok(())
}
