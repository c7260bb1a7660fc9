//! Holds the `acceptance` test target, which prints one PASS/FAIL line per
//! criterion. It lives in its own package so it runs after the `polarbp`
//! unit and integration tests.
