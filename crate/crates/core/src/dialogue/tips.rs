use super::Phase;

/// Static guidance shown in the tips panel for a phase.
pub fn tips_for(phase: Phase) -> Vec<String> {
    let tips: &[&str] = match phase {
        Phase::SelectApp => &["Select the app you want to report a problem for."],
        Phase::CollectOb | Phase::DisambiguateOb | Phase::ConfirmOb => &[
            "Describe one incorrect behavior you observed, in a single sentence.",
            "Name the screen elements involved, e.g. \"The average fuel economy shows a NaN value\".",
            "Avoid generic wording such as \"the app crashed\" without details.",
        ],
        Phase::CollectEb | Phase::ConfirmEbScreen => &[
            "Describe what the app should have done instead.",
            "For example: \"The average fuel economy should be a number\".",
        ],
        Phase::CollectS2r | Phase::OfferSuggestions | Phase::ConfirmS2r => &[
            "Describe one step at a time, in imperative form, e.g. \"Tap the save button\".",
            "Select the suggested steps you performed, in order, or none if they do not apply.",
            "Put typed values in quotes, e.g. Enter \"15\" in the fuel amount field.",
        ],
        Phase::CollectInput => &["Write the exact value you entered."],
        Phase::ConfirmLastStep => &["Answer yes if the problem appeared right after this step."],
        Phase::Preview => &[
            "Review the report. You can edit step text or delete the last step.",
            "Use Finish to submit the report.",
        ],
        Phase::Done => &[],
    };
    tips.iter().map(|s| s.to_string()).collect()
}
