mod common;

use sdtkit::context::{
    bilingual_context_source, bilingual_context_target, constrain, context_range, monolingual_context, render_input,
    ContextEntry, GoldOnly, Origin, TextPolicy,
};
use sdtkit::corpus::{assign_languages, split_scenario, AnnotatedDialogue, Variant};
use sdtkit::lang::Lang;

fn three_turn_dialogue() -> AnnotatedDialogue {
    let corpus = common::three_turn();
    let s = &corpus.scenarios[0];
    let (a, _) = split_scenario(s);
    assert_eq!(a.variant, Variant::A);
    assign_languages(&a, s).unwrap()
}

fn texts(w: &sdtkit::context::ContextWindow) -> Vec<&str> {
    w.texts().collect()
}

#[test]
fn three_turn_spoken_languages() {
    let d = three_turn_dialogue();
    let spoken: Vec<Lang> = d.turns.iter().map(|t| t.spoken).collect();
    assert_eq!(spoken, [Lang::Ja, Lang::En, Lang::Ja]);
}

#[test]
fn three_turn_monolingual_windows() {
    let d = three_turn_dialogue();
    let ja = monolingual_context(&d, 3, 5, Lang::Ja, TextPolicy::Gold, &GoldOnly).unwrap();
    assert_eq!(texts(&ja), ["彼は良い考えだと言ってました。", "あなたはどう思いますか?"]);
    assert_eq!(texts(&ja).concat(), "彼は良い考えだと言ってました。あなたはどう思いますか?");
    let en = monolingual_context(&d, 3, 5, Lang::En, TextPolicy::Gold, &GoldOnly).unwrap();
    assert_eq!(texts(&en), ["He said it's a good idea.", "What do you think about it?"]);
    assert!(ja.entries().iter().all(|e| e.language == Lang::Ja && e.origin == Origin::Gold));
    assert!(monolingual_context(&d, 1, 5, Lang::Ja, TextPolicy::Gold, &GoldOnly).unwrap().is_empty());
}

#[test]
fn three_turn_bilingual_windows() {
    let d = three_turn_dialogue();
    let src = bilingual_context_source(&d, 3, 5, TextPolicy::Gold, &GoldOnly).unwrap();
    assert_eq!(texts(&src).concat(), "彼は良い考えだと言ってました。What do you think about it?");
    let tgt = bilingual_context_target(&d, 3, 5).unwrap();
    assert_eq!(texts(&tgt).join(" "), "He said it's a good idea. あなたはどう思いますか?");
    let langs = |w: &sdtkit::context::ContextWindow| w.entries().iter().map(|e| e.language).collect::<Vec<_>>();
    assert_eq!(langs(&src), [Lang::Ja, Lang::En]);
    assert_eq!(langs(&tgt), [Lang::En, Lang::Ja]);
    let one = bilingual_context_source(&d, 2, 1, TextPolicy::Gold, &GoldOnly).unwrap();
    assert_eq!(texts(&one), ["彼は良い考えだと言ってました。"]);
    assert!(bilingual_context_target(&d, 1, 5).unwrap().is_empty());
}

#[test]
fn three_turn_rendered_input() {
    let d = three_turn_dialogue();
    let src = bilingual_context_source(&d, 3, 5, TextPolicy::Gold, &GoldOnly).unwrap();
    let rendered = render_input(&src, "ちょっと甘いと思います。", "</s>").unwrap();
    assert_eq!(
        rendered,
        "彼は良い考えだと言ってました。</s>What do you think about it?</s>ちょっと甘いと思います。"
    );
}

#[test]
fn target_window_is_language_flip_on_every_fixture_turn() {
    for corpus in [common::three_turn(), common::small()] {
        for s in &corpus.scenarios {
            let (a, b) = split_scenario(s);
            for cld in [a, b] {
                let d = assign_languages(&cld, s).unwrap();
                for t in 1..=d.len() {
                    for c in 0..=4 {
                        let src = bilingual_context_source(&d, t, c, TextPolicy::Gold, &GoldOnly).unwrap();
                        let tgt = bilingual_context_target(&d, t, c).unwrap();
                        assert_eq!(src.indices(), tgt.indices());
                        for (x, y) in src.entries().iter().zip(tgt.entries()) {
                            assert_eq!(x.language.other(), y.language);
                            let u = s.utterance(x.t).unwrap();
                            assert_eq!(x.text, u.gold(x.language));
                            assert_eq!(y.text, u.gold(y.language));
                        }
                        assert_eq!(src.len(), c.min(t - 1));
                    }
                }
            }
        }
    }
}

#[test]
fn constrain_examples() {
    let entry = |t| ContextEntry {
        t,
        language: Lang::En,
        text: format!("u{t}"),
        origin: Origin::Gold,
    };
    assert_eq!(constrain((1..3).map(entry), 5, 3).indices(), [1, 2]);
    assert!(constrain((1..3).map(entry), 0, 3).is_empty());
    assert_eq!(constrain((1..9).map(entry), 3, 9).indices(), [6, 7, 8]);
    assert_eq!(context_range(3, 9), 6..=8);
}
