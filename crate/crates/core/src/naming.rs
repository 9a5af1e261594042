//! Attribute-name normalization and object-name selection, shared by the
//! relational and XML builders.

use crate::graph::PropertyNode;

/// Normalize an attribute or relation name for comparison: lowercase,
/// strip `_` and `-`, and drop one trailing `id` unless that would leave
/// nothing. `student_id`, `StudentID` and `studentid` all normalize to
/// `student`; `id` stays `id`.
pub fn normalize_attr_name(name: &str) -> String {
    let mut s: String = name
        .to_lowercase()
        .chars()
        .filter(|c| *c != '_' && *c != '-')
        .collect();
    if s.len() > 2 && s.ends_with("id") {
        s.truncate(s.len() - 2);
    }
    s
}

/// Ordered list of property names (normalized form) that may serve as an
/// object's display name.
#[derive(Debug, Clone)]
pub struct NamePreference(Vec<String>);

impl Default for NamePreference {
    fn default() -> Self {
        NamePreference::new(&["name", "title", "label", "caption"])
    }
}

impl NamePreference {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        NamePreference(
            names
                .iter()
                .map(|n| normalize_attr_name(n.as_ref()))
                .collect(),
        )
    }
}

/// Pick an object's name: the value of the first top-level property whose
/// normalized name appears in the preference list, scanning the list in
/// priority order. Properties without a value of their own are skipped.
pub fn choose_object_name(
    properties: &[PropertyNode],
    preference: &NamePreference,
) -> Option<String> {
    for wanted in &preference.0 {
        for property in properties {
            if property.value.is_some() && &normalize_attr_name(&property.name) == wanted {
                return property.value.clone();
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_case_separators_and_id_suffix() {
        assert_eq!(normalize_attr_name("student_id"), "student");
        assert_eq!(normalize_attr_name("Country"), "country");
        assert_eq!(normalize_attr_name("river1"), "river1");
        assert_eq!(normalize_attr_name("id"), "id");
        assert_eq!(normalize_attr_name("ID"), "id");
    }

    #[test]
    fn normalization_is_idempotent() {
        for name in ["student_id", "GRADER-ID", "x", "id", "Rhône"] {
            let once = normalize_attr_name(name);
            assert_eq!(normalize_attr_name(&once), once);
        }
    }

    #[test]
    fn picks_name_by_priority_not_position() {
        let props = vec![
            PropertyNode::leaf("title", "DB Systems"),
            PropertyNode::leaf("name", "CS186"),
        ];
        assert_eq!(
            choose_object_name(&props, &NamePreference::default()),
            Some("CS186".to_owned())
        );
    }

    #[test]
    fn chooses_the_name_property_for_france() {
        let props = vec![
            PropertyNode::leaf("code", "F"),
            PropertyNode::leaf("name", "France"),
            PropertyNode::leaf("population", "58M"),
        ];
        assert_eq!(
            choose_object_name(&props, &NamePreference::default()),
            Some("France".to_owned())
        );
    }

    #[test]
    fn no_candidate_yields_none() {
        let props = vec![PropertyNode::leaf("lng", "45°43'N")];
        assert_eq!(choose_object_name(&props, &NamePreference::default()), None);
        assert_eq!(choose_object_name(&[], &NamePreference::default()), None);
    }
}
