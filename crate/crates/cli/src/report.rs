//! Plain-text and JSON report assembled from stage artifacts only.

use std::fmt::Write as _;

use artequity_core::bftest::Category;
use artequity_core::careers::CoGender;

use crate::artifacts::StageWriter;
use crate::error::CliError;
use crate::stages::{load_bundle, Bundle, Ctx};

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_else(|| "-".into())
}

pub fn render(b: &Bundle) -> String {
    let mut s = String::new();
    let i = &b.ingest;
    let _ = writeln!(s, "CORPUS");
    let _ = writeln!(
        s,
        "  raw rows: {} artists, {} exhibitions, {} auction records ({} rejected)",
        i.raw_rows.artists,
        i.raw_rows.exhibitions,
        i.raw_rows.auctions,
        i.rejects.len()
    );
    let _ = writeln!(
        s,
        "  retained: {} artists, {} exhibitions, {} auction records; women fraction {:.4}",
        i.retained.artists, i.retained.exhibitions, i.retained.auctions, i.women_fraction
    );
    for w in &i.warnings {
        let _ = writeln!(s, "  warning: {w}");
    }

    let _ = writeln!(s, "\nINSTITUTION CLASSIFICATION");
    for c in &b.classify {
        let sum = &c.institutions;
        let _ = writeln!(s, "  {} (p0 = {:.4}), {} institutions", sum.criterion.as_str(), c.criterion.p0, sum.units);
        for cat in Category::ALL {
            let share = sum.categorised_shares.get(&cat).copied();
            let _ = writeln!(s, "    {:<16} {:>6}  {:>7}", cat.as_str(), sum.counts[&cat], opt(share, 3));
        }
        let _ = writeln!(s, "    uncategorised exhibition share {:.3}", sum.uncategorised_exhibition_share);
        if let Some(cs) = &c.countries {
            let counts: Vec<String> = Category::ALL.iter().map(|k| format!("{} {}", k.as_str(), cs.counts[k])).collect();
            let _ = writeln!(s, "    countries: {}", counts.join(", "));
        }
    }

    let n = &b.network;
    let _ = writeln!(s, "\nCO-EXHIBITION NETWORK");
    let _ = writeln!(
        s,
        "  {} institutions, {} edges, total weight {}; prestige converged in {} iterations",
        n.nodes, n.edges, n.total_weight, n.prestige_iterations
    );
    for (kind, a) in &n.assortativity {
        let _ = writeln!(s, "  assortativity ({}): source -> same-category share vs baseline", kind.as_str());
        for cat in Category::CATEGORISABLE {
            let own = a.categorised_shares.get(&cat).cloned().flatten().and_then(|m| m.get(&cat).copied());
            let _ = writeln!(s, "    {:<16} {:>7}  {:>7}", cat.as_str(), opt(own, 3), opt(a.baseline.get(&cat).copied(), 3));
        }
    }

    let _ = writeln!(s, "\nCO-EXHIBITION GENDER");
    for c in &b.careers {
        let _ = writeln!(s, "  {} (min {} exhibitions)", c.criterion.as_str(), c.min_exhibitions);
        for (g, counts) in &c.label_counts {
            let parts: Vec<String> = CoGender::ASSIGNED
                .iter()
                .chain([CoGender::Unassigned].iter())
                .map(|k| format!("{} {}", k.as_str(), counts.get(k).copied().unwrap_or(0)))
                .collect();
            let _ = writeln!(s, "    {:<6} {}", g.as_str(), parts.join(", "));
        }
        let l = &c.lock_in;
        let _ = writeln!(
            s,
            "    lock-in (window {}, {} artists, {} skipped): early -> late",
            l.window, l.artists_included, l.artists_skipped
        );
        for (r, early) in CoGender::ASSIGNED.iter().enumerate() {
            let row = l.global.probabilities[r];
            let cells: Vec<String> = (0..3).map(|j| opt(row.map(|p| p[j]), 3)).collect();
            let _ = writeln!(s, "      {:<11} {}", early.as_str(), cells.join("  "));
        }
    }

    let _ = writeln!(s, "\nAUCTION DISPARITY");
    let _ = writeln!(s, "  {:<30} {:>14} {:>14} {:>8}", "metric", "man", "woman", "ratio");
    for r in &b.disparity.rows {
        let _ = writeln!(
            s,
            "  {:<30} {:>14} {:>14} {:>8}",
            r.metric.label(),
            opt(r.man, 4),
            opt(r.woman, 4),
            opt(r.ratio, 2)
        );
    }

    let g = &b.regress;
    let _ = writeln!(s, "\nAUCTION ACCESS REGRESSION ({} labels, N = {})", g.criterion.as_str(), g.n);
    for m in &g.models {
        let f = &m.fit;
        let _ = writeln!(s, "  {} (lnL {:.2}, BIC {:.2}, df {})", m.model, f.log_likelihood, f.bic, f.df);
        let _ = writeln!(s, "    {:<22} {:>9} {:>9} {:>8} {:>9}  95% CI", "term", "coef", "odds", "se", "p");
        for c in &f.coefficients {
            let _ = writeln!(
                s,
                "    {:<22} {:>9.3} {:>9.3} {:>8} {:>9}  [{}, {}]",
                c.name,
                c.coef,
                c.odds_ratio,
                opt(c.se, 3),
                c.p_value.map(|p| format!("{p:.2e}")).unwrap_or_else(|| "-".into()),
                opt(c.ci_low, 3),
                opt(c.ci_high, 3)
            );
        }
        for w in &m.warnings {
            let _ = writeln!(s, "    warning: {w}");
        }
    }
    let _ = writeln!(s, "  model comparison");
    for c in &g.comparison {
        let _ = writeln!(s, "    {:<10} BIC {:>12.2}  dBIC {:>10.2}", c.label, c.bic, c.delta_bic);
    }
    if let Some(p) = g.predictions.first() {
        let _ = writeln!(
            s,
            "  Model 4 access probability at {:.3} exhibitions/year, {} year careers",
            p.exhibitions_per_year, p.career_length
        );
    }
    for p in &g.predictions {
        let flag = if p.extrapolated { " (extrapolated)" } else { "" };
        let _ = writeln!(s, "    {:<6} {:<11} {:.4}{flag}", p.gender.as_str(), p.co_gender.as_str(), p.probability);
    }
    s
}

pub fn report(ctx: &Ctx) -> Result<(), CliError> {
    let bundle = load_bundle(ctx)?;
    let text = render(&bundle);
    let mut w = StageWriter::new(ctx.out, "report", &ctx.meta)?;
    w.raw("report.txt", text.as_bytes())?;
    w.json("report.json", &bundle)?;
    w.finish()?;
    print!("{text}");
    Ok(())
}
