//! Correlation of pause measures with MOS on the bundled subjective data.

use pause_intensity::corr::{
    correlation_csv, correlation_table, load_dataset, spearman, Content, DatasetSource,
};

fn main() -> pause_intensity::Result<()> {
    let ds = load_dataset(DatasetSource::Table3)?.merge(load_dataset(DatasetSource::Table5)?)?;
    print!("{}", correlation_csv(&correlation_table(&ds)?));

    let m: Vec<_> = ds.with_content(Content::M).collect();
    let pi: Vec<f64> = m.iter().map(|r| r.pi).collect();
    let mos: Vec<f64> = m.iter().map(|r| r.mos).collect();
    println!(
        "rank correlation of PI with MOS, content M: {:.3}",
        spearman(&pi, &mos)?
    );
    Ok(())
}
