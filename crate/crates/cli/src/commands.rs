use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use dynpair::assign::{
    assignment, check_axiom_factor, check_axiom_invariance, classify_assignment_realizable, entropy_link_check,
    equicontinuity_check, AxiomReport, LinkOutcome,
};
use dynpair::format::{self, FormatError};
use dynpair::gamma::{classify_full, classify_realizable, gamma_rank};
use dynpair::symbolic::apply_code;
use dynpair::{
    cb_rank, AssignmentKind, EdgeShift, IeParams, PairStatus, PathAutomaton, Rank, RankResult, Relation,
    SlidingBlockCode, SpacePresentation, Verdict,
};

use crate::args::{Budget, Command, IeArgs, RelationInput};
use crate::report::{num, Report};
use crate::{corpus, CliError, Outcome};

pub fn dispatch(command: &Command, echo: &[String], base: &Path) -> Result<Outcome, CliError> {
    let mut report = Report::new(echo);
    let mut ctx = Ctx {
        base,
        report: &mut report,
    };
    let stdout = match command {
        Command::Entropy { sft, code } => {
            ctx.entropy(sft, code.as_deref())?;
            None
        }
        Command::Words { sft, length } => {
            ctx.words(sft, *length)?;
            None
        }
        Command::Pairs {
            sft,
            kind,
            depth,
            ie,
            budget,
        } => Some(ctx.pairs(sft, *kind, *depth, ie, budget)?),
        Command::Rank { input, cap, ie, budget } => {
            ctx.rank(input, *cap, ie, budget)?;
            None
        }
        Command::Classify {
            input,
            max_depth,
            cap,
            ie,
            budget,
        } => {
            ctx.classify(input, *max_depth, *cap, ie, budget)?;
            None
        }
        Command::CbRank { automaton, space } => {
            ctx.cb_rank(automaton.as_deref(), space.as_deref())?;
            None
        }
        Command::CheckAxioms {
            sft,
            code,
            depth,
            ie,
            budget,
        } => {
            ctx.check_axioms(sft, code, *depth, ie, budget)?;
            None
        }
        Command::Corpus { dir, bless } => return corpus::run_corpus(&base.join(dir), *bless),
    };
    Ok(Outcome {
        code: 0,
        stdout: stdout.unwrap_or_else(|| report.render()),
        stderr: report.warnings.iter().map(|w| format!("warning: {w}\n")).collect(),
    })
}

struct Ctx<'a> {
    base: &'a Path,
    report: &'a mut Report,
}

fn witness_value(v: &Verdict) -> Value {
    v.witness().map_or(Value::Null, |w| w.to_string().into())
}

fn rank_value(rank: Rank) -> (Value, bool) {
    match rank {
        Rank::Exact(n) => (n.into(), true),
        Rank::AtLeast(n) => (n.into(), false),
    }
}

fn axiom_value(r: &AxiomReport) -> Value {
    json!({ "passed": r.passed, "checked": r.checked, "failures": r.failures.len() })
}

impl Ctx<'_> {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = std::fs::read_to_string(self.base.join(path)).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.report.input(path, &text);
        Ok(text)
    }

    fn parsed<T>(&mut self, path: &Path, parse: impl FnOnce(&str) -> Result<T, FormatError>) -> Result<T, CliError> {
        let text = self.read(path)?;
        parse(&text).map_err(|source| CliError::Format {
            path: path.to_path_buf(),
            source,
        })
    }

    fn shift(&mut self, path: &Path) -> Result<Arc<EdgeShift>, CliError> {
        let doc = self.parsed(path, format::parse_sft)?;
        Ok(Arc::new(doc.build()))
    }

    fn space(&mut self, path: &Path) -> Result<Arc<SpacePresentation>, CliError> {
        Ok(Arc::new(self.parsed(path, format::parse_space)?))
    }

    fn code(&mut self, path: &Path, source: &[char]) -> Result<SlidingBlockCode, CliError> {
        self.parsed(path, |t| format::parse_code(t, source))
    }

    fn params(&self, ie: &IeArgs) -> Result<IeParams, CliError> {
        let p = ie.params();
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }

    fn check_blocks(&self, shift: &EdgeShift, depth: usize, budget: &Budget) -> Result<(), CliError> {
        let n = shift.blocks(depth).len();
        if n > budget.max_blocks {
            return Err(CliError::Budget(format!(
                "{n} blocks at depth {depth}, limit {} (raise --max-blocks)",
                budget.max_blocks
            )));
        }
        Ok(())
    }

    fn entropy(&mut self, sft: &Path, code: Option<&Path>) -> Result<(), CliError> {
        let source = self.shift(sft)?;
        let shift = match code {
            Some(c) => {
                let code = self.code(c, source.alphabet())?;
                self.report.result("sourceEntropy", num(source.entropy()?));
                Arc::new(apply_code(&code, &source)?)
            }
            None => source,
        };
        if shift.is_empty() {
            return Err(dynpair::ShiftError::EmptyShift.into());
        }
        let rep = shift.entropy_report()?;
        self.report.result("entropy", num(rep.spectral));
        let growth: Map<String, Value> = rep.growth.iter().map(|&(n, g)| (n.to_string(), num(g))).collect();
        self.report.result("growth", growth);
        self.report.result("states", shift.num_states());
        self.report.flag("entropy", "Exact");
        Ok(())
    }

    fn words(&mut self, sft: &Path, length: usize) -> Result<(), CliError> {
        let shift = self.shift(sft)?;
        let words: Vec<String> = shift.words(length).iter().map(|w| shift.render(w)).collect();
        self.report.result("length", length);
        self.report.result("count", words.len());
        self.report.result("words", words);
        Ok(())
    }

    fn pairs(
        &mut self,
        sft: &Path,
        kind: AssignmentKind,
        depth: usize,
        ie: &IeArgs,
        budget: &Budget,
    ) -> Result<String, CliError> {
        let shift = self.shift(sft)?;
        let params = self.params(ie)?;
        self.check_blocks(&shift, depth, budget)?;
        let res = assignment(&shift, kind, depth, &params)?;
        let blocks = shift.blocks(depth);
        let mut out = String::from("blockU\tblockV\tstatus\twitness\n");
        for u in &blocks {
            for v in &blocks {
                let (status, witness) = match kind {
                    AssignmentKind::Ie => {
                        let s = res.per_pair.get(&(u.clone(), v.clone())).unwrap_or(&PairStatus::UnknownAtBudget);
                        (s.name().to_string(), s.witness())
                    }
                    _ if res.relation.member(u, v) => ("Related".to_string(), "-".to_string()),
                    _ => ("Unrelated".to_string(), "-".to_string()),
                };
                out.push_str(&format!("{}\t{}\t{status}\t{witness}\n", shift.render(u), shift.render(v)));
            }
        }
        Ok(out)
    }

    /// The relation named by the input flags, plus the shift when block based.
    fn relation(
        &mut self,
        input: &RelationInput,
        params: &IeParams,
        budget: &Budget,
    ) -> Result<(Relation, Option<Arc<EdgeShift>>), CliError> {
        match (&input.space, &input.sft, &input.relation, input.assignment) {
            (Some(space), None, Some(rel), None) => {
                let space = self.space(space)?;
                let doc = self.parsed(rel, format::parse_relation)?;
                let (r, warnings) = format::family_relation(space, &doc).map_err(|source| CliError::Format {
                    path: rel.clone(),
                    source,
                })?;
                self.report.warnings.extend(warnings);
                Ok((Relation::Family(r), None))
            }
            (None, Some(sft), Some(rel), None) => {
                let shift = self.shift(sft)?;
                let doc = self.parsed(rel, format::parse_relation)?;
                let (r, warnings) = format::block_relation(shift.clone(), &doc).map_err(|source| CliError::Format {
                    path: rel.clone(),
                    source,
                })?;
                self.check_blocks(&shift, r.depth(), budget)?;
                self.report.warnings.extend(warnings);
                Ok((Relation::Block(r), Some(shift)))
            }
            (None, Some(sft), None, Some(kind)) => {
                let shift = self.shift(sft)?;
                self.check_blocks(&shift, input.depth, budget)?;
                let res = assignment(&shift, kind, input.depth, params)?;
                Ok((Relation::Block(res.relation), Some(shift)))
            }
            _ => Err(CliError::Usage(
                "give --space with --relation, --sft with --relation, or --sft with --assignment".into(),
            )),
        }
    }

    fn rank_results(&mut self, res: &RankResult) {
        let (rank, exact) = rank_value(res.rank);
        self.report.result("backend", res.stable.backend_name());
        self.report.result("rank", rank);
        self.report.result("rankExact", exact);
        let stages: Vec<usize> = res.stages.iter().map(Relation::size).collect();
        self.report.result("stages", stages);
        self.report.flag("flag", res.flag.to_string());
    }

    fn rank(&mut self, input: &RelationInput, cap: usize, ie: &IeArgs, budget: &Budget) -> Result<(), CliError> {
        let params = self.params(ie)?;
        let (rel, _) = self.relation(input, &params, budget)?;
        let res = gamma_rank(&rel, cap)?;
        self.rank_results(&res);
        let verdict = classify_realizable(&rel, cap)?;
        self.report.result("verdict", verdict.to_string());
        self.report.result("witness", witness_value(&verdict));
        Ok(())
    }

    fn classify(
        &mut self,
        input: &RelationInput,
        max_depth: Option<usize>,
        cap: usize,
        ie: &IeArgs,
        budget: &Budget,
    ) -> Result<(), CliError> {
        let params = self.params(ie)?;
        let (rel, shift) = self.relation(input, &params, budget)?;
        let res = gamma_rank(&rel, cap)?;
        self.rank_results(&res);
        let full = classify_full(&rel);
        let verdict = match (shift, input.assignment) {
            (Some(shift), Some(kind)) => {
                let max = max_depth.unwrap_or(input.depth).max(input.depth);
                for k in input.depth..=max {
                    self.check_blocks(&shift, k, budget)?;
                }
                self.report.result("maxDepth", max);
                classify_assignment_realizable(&shift, kind, input.depth, max, &params, cap)?
            }
            _ => classify_realizable(&rel, cap)?,
        };
        self.report.result("full", full.to_string());
        self.report.result("fullWitness", witness_value(&full));
        self.report.result("verdict", verdict.to_string());
        self.report.result("witness", witness_value(&verdict));
        if let Some(w) = verdict.witness() {
            self.report.witnesses.push(w.to_string().into());
        }
        Ok(())
    }

    fn cb_rank(&mut self, automaton: Option<&Path>, space: Option<&Path>) -> Result<(), CliError> {
        let a = match (automaton, space) {
            (Some(a), _) => self.parsed(a, format::parse_automaton)?,
            (None, Some(s)) => PathAutomaton::from_space(&*self.space(s)?),
            (None, None) => return Err(CliError::Usage("give --automaton or --space".into())),
        };
        let res = cb_rank(&a)?;
        self.report.result("rank", res.rank);
        self.report.result("scattered", res.scattered);
        let stages: Vec<usize> = res.stages.iter().map(PathAutomaton::num_states).collect();
        self.report.result("stages", stages);
        if let Some((state, u, v)) = res.stable.perfect_witness() {
            let w = json!({ "state": state, "loops": [u, v] });
            self.report.result("perfectWitness", w.clone());
            self.report.witnesses.push(w);
        } else {
            self.report.result("perfectWitness", Value::Null);
        }
        self.report.flag("rank", "Exact");
        Ok(())
    }

    fn check_axioms(
        &mut self,
        sft: &Path,
        codes: &[std::path::PathBuf],
        depth: usize,
        ie: &IeArgs,
        budget: &Budget,
    ) -> Result<(), CliError> {
        let shift = self.shift(sft)?;
        let params = self.params(ie)?;
        let mut loaded = Vec::new();
        for c in codes {
            let code = self.code(c, shift.alphabet())?;
            self.check_blocks(&shift, depth + code.window(), budget)?;
            loaded.push((c.display().to_string(), code));
        }
        self.check_blocks(&shift, depth, budget)?;
        let mut all_passed = true;
        for kind in AssignmentKind::ALL {
            let rel = assignment(&shift, kind, depth, &params)?.relation;
            let inv = check_axiom_invariance(&rel);
            all_passed &= inv.passed;
            let mut factors = Map::new();
            for (name, code) in &loaded {
                let rep = check_axiom_factor(kind, code, &shift, depth, &params)?;
                all_passed &= rep.passed;
                for (u, v) in &rep.failures {
                    self.report
                        .witnesses
                        .push(json!({ "axiom": "factor", "kind": kind.name(), "code": name, "pair": [u, v] }));
                }
                factors.insert(name.clone(), axiom_value(&rep));
            }
            for (u, v) in &inv.failures {
                self.report
                    .witnesses
                    .push(json!({ "axiom": "invariance", "kind": kind.name(), "pair": [u, v] }));
            }
            self.report.result(
                kind.name(),
                json!({ "invariance": axiom_value(&inv), "factor": Value::Object(factors) }),
            );
        }
        let link = entropy_link_check(&shift, 0, &params)?;
        let outcome = match link.outcome {
            LinkOutcome::Pass => "Pass",
            LinkOutcome::Fail => "Fail",
            LinkOutcome::Inconclusive => "Inconclusive",
        };
        self.report.result(
            "entropyLink",
            json!({
                "entropy": num(link.entropy),
                "positiveEntropy": link.positive_entropy,
                "certifiedOffDiagonal": link.certified_off_diagonal,
                "outcome": outcome,
            }),
        );
        let eq = equicontinuity_check(&shift, depth.max(2))?;
        self.report.result(
            "equicontinuity",
            json!({
                "equicontinuous": eq.equicontinuous,
                "witness": eq.witness.map(|(k, u, v)| json!({ "depth": k, "pair": [u, v] })),
            }),
        );
        self.report.result("passed", all_passed);
        Ok(())
    }
}
