//! Gnuplot scripts that read the emitted CSV by relative file name.

use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Long-format `x, y, z` grid.
    Heatmap,
    /// First column against every other column, lines and points.
    Curves,
    /// First column against every other column, lines only.
    TimeSeries,
}

const PREAMBLE: &str =
    "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";

pub fn script(kind: PlotKind, table: &ResultTable, csv_name: &str, stem: &str) -> String {
    let cols = &table.columns;
    let mut s = String::from(PREAMBLE);
    s.push_str(&format!(
        "set terminal pngcairo size 1000,700\nset output '{stem}.png'\n"
    ));
    match kind {
        PlotKind::Heatmap => {
            s.push_str(&format!(
                "set xlabel '{}'\nset ylabel '{}'\nset cblabel '{}'\nset view map\nset pm3d map\n\
                 splot '{csv_name}' using 1:2:3 with pm3d notitle\n",
                cols[0], cols[1], cols[2]
            ));
        }
        PlotKind::Curves | PlotKind::TimeSeries => {
            let style = if kind == PlotKind::Curves {
                "linespoints pointsize 0.4"
            } else {
                "lines"
            };
            s.push_str(&format!("set xlabel '{}'\n", cols[0]));
            if kind == PlotKind::Curves && table.meta_value("config.sweep_rq.log") == Some("true") {
                s.push_str("set logscale x\n");
            }
            let series: Vec<String> = (2..=cols.len())
                .map(|i| format!("'{csv_name}' using 1:{i} with {style}"))
                .collect();
            s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
        }
    }
    s
}
