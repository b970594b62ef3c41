use std::path::PathBuf;

use camsim::embedding::{assemble_encoder_input, coarse_embedding, setting_diff_features, HashEmbeddingProvider};
use camsim::{SettingKind, SettingSet};
use clap::Args;

use super::{check_value, load_config, parse_kind, Failure};

#[derive(Args)]
pub struct EmbedArgs {
    /// Setting kind: bokeh, focal, shutter or colortemp
    #[arg(long, value_parser = parse_kind)]
    task: SettingKind,

    /// Comma-separated setting values, in frame order
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    values: Vec<f64>,

    /// Embedding size as CxHxW, e.g. 3x32x32
    #[arg(long, value_parser = parse_dims)]
    dims: (usize, usize, usize),

    /// Output tensor file
    #[arg(long)]
    out: PathBuf,

    /// Append label-difference features from the built-in hash provider of
    /// this dimension (output then has 2C channels)
    #[arg(long)]
    diff_dim: Option<usize>,

    /// JSON config file (sensor geometry for focal masks)
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let [c, h, w] = parts.as_slice() else {
        return Err(format!("expected CxHxW, got `{s}`"));
    };
    let p = |v: &str| match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{v}` is not a positive integer")),
    };
    Ok((p(c)?, p(h)?, p(w)?))
}

pub fn run(args: EmbedArgs) -> Result<(), Failure> {
    for &v in &args.values {
        check_value(args.task, v)?;
    }
    if args.values.len() < 2 {
        return Err(Failure::Usage("--values needs at least two values".into()));
    }
    if args.diff_dim == Some(0) {
        return Err(Failure::Usage("--diff-dim must be positive".into()));
    }
    let config = load_config(args.config.as_deref())?;
    let (c, h, w) = args.dims;
    let set = SettingSet::new(args.task, args.values, 0)?;
    let mut tensor = coarse_embedding(&set, c, h, w, &config.focal.spec)?;
    if let Some(dim) = args.diff_dim {
        let diffs = setting_diff_features(&set, &HashEmbeddingProvider::new(dim))?;
        tensor = assemble_encoder_input(&tensor, &diffs)?;
    }
    tensor.write(&args.out)?;
    let (f_r, c, h, w) = tensor.dims();
    tracing::info!(f_r, c, h, w, out = %args.out.display(), "embedding written");
    Ok(())
}
