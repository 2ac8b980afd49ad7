use std::sync::{Condvar, Mutex};

/// Counting semaphore capping in-flight requests to one backend.
#[derive(Debug)]
pub struct Limiter {
    available: Mutex<usize>,
    released: Condvar,
}

pub struct Permit<'a> {
    limiter: &'a Limiter,
}

impl Limiter {
    pub fn new(permits: usize) -> Self {
        Limiter { available: Mutex::new(permits.max(1)), released: Condvar::new() }
    }

    pub fn acquire(&self) -> Permit<'_> {
        let mut available = self.available.lock().unwrap_or_else(|e| e.into_inner());
        while *available == 0 {
            available = self.released.wait(available).unwrap_or_else(|e| e.into_inner());
        }
        *available -= 1;
        Permit { limiter: self }
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut available = self.limiter.available.lock().unwrap_or_else(|e| e.into_inner());
        *available += 1;
        self.limiter.released.notify_one();
    }
}
