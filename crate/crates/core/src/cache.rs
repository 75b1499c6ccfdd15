//! Process-wide memo tables for resolutions and Ext groups.
//!
//! Each key owns a `OnceLock`, so the first caller computes the value while
//! concurrent callers for the same key wait for it; different keys never
//! block each other beyond the short map lookup.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, LazyLock, Mutex, OnceLock};

use crate::error::Result;
use crate::ext::ExtGroup;
use crate::module::{FPModule, FreeResolution};

pub(crate) struct KeyedCache<K, V> {
    map: Mutex<HashMap<K, Arc<OnceLock<V>>>>,
}

impl<K: Eq + Hash + Clone, V: Clone> KeyedCache<K, V> {
    fn new() -> Self {
        KeyedCache {
            map: Mutex::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or_init(&self, key: &K, init: impl FnOnce() -> V) -> V {
        let cell = {
            let mut map = self.map.lock().unwrap_or_else(|e| e.into_inner());
            map.entry(key.clone()).or_default().clone()
        };
        cell.get_or_init(init).clone()
    }

    fn clear(&self) {
        self.map.lock().unwrap_or_else(|e| e.into_inner()).clear();
    }

    fn len(&self) -> usize {
        self.map.lock().unwrap_or_else(|e| e.into_inner()).len()
    }
}

static RESOLUTIONS: LazyLock<KeyedCache<(FPModule, usize), Arc<FreeResolution>>> =
    LazyLock::new(KeyedCache::new);

type ExtKey = (usize, FPModule, FPModule);
static EXT_GROUPS: LazyLock<KeyedCache<ExtKey, Result<Arc<ExtGroup>>>> =
    LazyLock::new(KeyedCache::new);

/// The shared resolution of `m` with `depth` differentials.
pub fn resolution(m: &FPModule, depth: usize) -> Arc<FreeResolution> {
    RESOLUTIONS.get_or_init(&(m.clone(), depth), || {
        Arc::new(FreeResolution::new(m, depth))
    })
}

pub(crate) fn ext_group_cached(
    p: usize,
    m: &FPModule,
    k: &FPModule,
    init: impl FnOnce() -> Result<Arc<ExtGroup>>,
) -> Result<Arc<ExtGroup>> {
    EXT_GROUPS.get_or_init(&(p, m.clone(), k.clone()), init)
}

/// Drops every cached resolution and Ext group.
pub fn clear_caches() {
    RESOLUTIONS.clear();
    EXT_GROUPS.clear();
}

/// Number of cached `(resolutions, ext groups)`.
pub fn cache_sizes() -> (usize, usize) {
    (RESOLUTIONS.len(), EXT_GROUPS.len())
}
