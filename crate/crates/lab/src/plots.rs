//! Gnuplot scripts that read the CSV outputs.

/// Log–log plot of the columns of `curves.csv` (first column `eps`).
pub fn convergence_script(columns: &[String]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset key autotitle columnhead left top\nset logscale xy\nset xlabel 'eps'\nset ylabel 'norm'\nset grid\n",
    );
    s += "set terminal pngcairo size 900,650\nset output 'convergence.png'\nplot \\\n";
    let lines: Vec<String> = (0..columns.len()).map(|k| format!("  'curves.csv' using 1:{} with linespoints", k + 2)).collect();
    s += &lines.join(", \\\n");
    s.push('\n');
    s
}

/// Interface radius of the sharp problem and of each diffuse run.
pub fn radius_script(histories: &[(f64, String)]) -> String {
    let mut s = String::from("set datafile separator ','\nset xlabel 't'\nset ylabel 'R'\nset grid\n");
    s += "set terminal pngcairo size 900,650\nset output 'radius.png'\nplot 'sharp.csv' using 1:2 with lines lw 2 title 'sharp'";
    for (eps, file) in histories {
        s += &format!(", \\\n  '{file}' using 1:2 with lines title 'eps = {eps}'");
    }
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_reference_their_inputs() {
        let c = convergence_script(&["a".into(), "b".into()]);
        assert!(c.contains("using 1:2") && c.contains("using 1:3"));
        let r = radius_script(&[(0.04, "history_eps0.04.csv".into())]);
        assert!(r.contains("sharp.csv") && r.contains("history_eps0.04.csv"));
    }
}
